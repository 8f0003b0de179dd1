"""
This file is part of raypath
"""
