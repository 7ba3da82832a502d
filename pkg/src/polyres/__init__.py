"""Rewriting, polygraphic resolutions and homological syzygies of presentations."""

__version__ = "0.1.0"
