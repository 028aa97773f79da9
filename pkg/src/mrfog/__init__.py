"""mrfog: fog-node geospatial gateway.

Edge ingestion and validation of vector layers, overlay analysis at the
fog node, compressed store-and-forward transmission to a cloud endpoint,
and the telemetry to measure what that saves.
"""

__version__ = "0.1.0"
