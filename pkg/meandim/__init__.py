"""
meandim
A desk-scale laboratory for mean dimension, Hausdorff contents and
rate-distortion theory of quantized shift systems
"""

__version__ = "1.0.0"
__author__ = "meandim developers"
