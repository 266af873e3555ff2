"""Controller library, environments, landscape tools and the bench harness."""
