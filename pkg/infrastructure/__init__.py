"""Infrastructure layer - run directories and file-backed repositories."""
