"""Equitable rent-reduction decision support.

Generates synthetic commercial-lease cases, renders them as deed-style
documents, trains regression models that predict an equitable percentage
rent reduction, explains predictions with exact interventional Shapley
attributions, and answers single-feature counterfactual queries over a
REST service and CLI.
"""

__version__ = "0.1.0"
