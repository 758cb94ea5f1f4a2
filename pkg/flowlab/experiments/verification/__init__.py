from .property_suite import PropertySuite, Property, PROPERTIES, OPERATIONS, LEVELS, verify_suite, coverage_manifest
