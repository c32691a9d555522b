"""__init__.py for repositories test package"""
