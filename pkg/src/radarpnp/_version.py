__version__ = '0.1.0.dev0'
__date__ = '2026-10-16'
