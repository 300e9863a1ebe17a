"""Monte Carlo experiments, one class per experiment kind."""
