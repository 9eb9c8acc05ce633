# resonator-sensing
__version__ = "0.1.0"
