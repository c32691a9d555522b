"""Domain models unit tests"""
