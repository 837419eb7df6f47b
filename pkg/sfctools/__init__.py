""" SFC Tools version """
__version__ = '0.1.1'
