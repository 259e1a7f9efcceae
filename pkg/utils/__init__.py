"""
Utils package - artifact bookkeeping and synthetic series
"""
