"""Zero-temperature random field Ising model laboratory."""

__version__ = "0.1.0"
__author__ = "ithaquakr"
__email__ = "ithadev.nguyen@gmail.com"
