"""Use cases orchestrating scenario runs."""
