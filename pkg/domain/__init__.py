"""Domain layer - grids, PDE right-hand sides, multistep schemes and their analysis."""
