"""Console message templates."""
