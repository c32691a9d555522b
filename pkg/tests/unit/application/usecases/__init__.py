"""Usecaseのユニットテスト用モジュール"""
