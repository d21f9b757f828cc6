"""Value types for hg-entangle."""
