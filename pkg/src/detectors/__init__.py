"""
Native community detection algorithms, one module per method.
"""
