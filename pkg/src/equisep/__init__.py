"""Equal point separation by line arrangements: exact constructions and oracles."""

__version__ = "0.1.0"
