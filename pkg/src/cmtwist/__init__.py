"""L-values of quadratic and cubic twists of the CM curve y^2 = 4x^3 - 27."""
