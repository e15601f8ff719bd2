"""swancycle: exact computation of wild ramification invariants and
characteristic cycles for degree-p Kummer covers of arithmetic surfaces."""

__version__ = "0.1.0"
