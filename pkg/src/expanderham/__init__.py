"""Hamilton cycles in expander graphs via rotations, linking structures and forest merges."""
