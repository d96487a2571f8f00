"""Test suite for PokePipeline."""

