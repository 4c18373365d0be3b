"""Orchestration of runs"""
