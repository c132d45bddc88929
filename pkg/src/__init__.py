"""String algebra workbench library."""
