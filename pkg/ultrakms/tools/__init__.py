"""Data model: numbers, ultragraphs, the presented families, text formats and the shift space."""
