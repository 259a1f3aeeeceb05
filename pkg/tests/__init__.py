# Tests package

