"""orthofit bench subpackage."""
