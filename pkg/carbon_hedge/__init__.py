"""
Carbon Hedge Network - sustainability factors, filtered correlation graphs
and embedding-based hedging portfolios
"""

__version__ = "0.1.0"
__author__ = "Carbon Hedge Team"
__description__ = "TMFG + node2vec hedging portfolios for sustainability risk factors"
