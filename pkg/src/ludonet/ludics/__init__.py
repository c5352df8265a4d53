"""Interactive designs: syntax, normalization machines, behaviours, terms."""
