exc_type  # unused variable (tgmixer/aioops.py:44)
exc_val  # unused variable (tgmixer/aioops.py:45)
exc_tb  # unused variable (tgmixer/aioops.py:46)
