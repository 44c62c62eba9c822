"""Matrix elements of coherent and generalized coherent operators."""
