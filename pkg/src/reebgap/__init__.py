"""Closing-lemma computations for ellipsoids and torus-action Reeb flows."""
