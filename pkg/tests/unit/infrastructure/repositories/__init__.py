"""Infrastructure repositories test package."""
