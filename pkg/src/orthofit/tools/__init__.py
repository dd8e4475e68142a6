"""orthofit tools subpackage."""
