"""Sequential hiring: exact and approximate adaptive offering policies."""

from _hiring import *  # noqa: F401,F403
