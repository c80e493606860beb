"""Phishing-awareness balloon-shooter training platform.

Seeded corpus synthesis of legitimate and deceptive URLs/emails, an
event-sourced three-stage game session engine, knowledge and self-efficacy
metrics, simulated-player cohorts, and a JSON service API.
"""

__version__ = "0.1.0"
