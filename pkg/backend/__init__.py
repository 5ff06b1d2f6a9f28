# Backend package for the Dirichlet Composition Lab
