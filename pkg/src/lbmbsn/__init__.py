"""Low-barrier-magnet stochastic neurons: macrospin dynamics, fluctuation analysis
and behavioural hardware neuron circuits."""

__version__ = "0.1.0"
