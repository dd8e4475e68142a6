"""orthofit ui subpackage."""
