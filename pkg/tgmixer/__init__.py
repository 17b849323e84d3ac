"""tgmixer package."""
