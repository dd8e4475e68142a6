"""orthofit core subpackage."""
