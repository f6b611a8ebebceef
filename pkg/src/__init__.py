# src/__init__.py
"""Численная лаборатория тепловых полугрупп на усечённых бесконечномерных торах"""
