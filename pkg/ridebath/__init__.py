"""Interactive bathtub model of a ride-sourcing city with density-based admission control and pooling-size optimization."""
__version__ = "1.0.0"
