"""Incident-reporting engine for live OT cybersecurity incidents.

A canonical 25-element report model with lifecycle activation,
audience-scoped views, standards crosswalks, regulatory deadline tracking,
append-only persistence, and an HTTP/CLI gateway for host frameworks and
coordinators.
"""

__version__ = "0.1.0"

EXPORT_FORMAT_VERSION = "air/1"
