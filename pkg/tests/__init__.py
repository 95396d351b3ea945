"""Unit tests for the AI Diagram Service.""" 