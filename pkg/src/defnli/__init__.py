"""Toolkit for building definition-augmented NLI datasets.

The pipeline marks classification-critical words with a masked-LM oracle,
attaches Wiktionary definitions to them, optionally scrambles the defined
words into random letter strings, and writes the resulting dataset matrix
as line-delimited JSON.
"""

__version__ = "0.1.0"
