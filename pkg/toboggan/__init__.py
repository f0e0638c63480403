from toboggan.toboggan import replay, run
