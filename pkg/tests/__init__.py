# Tests package for the carbon hedge pipeline
