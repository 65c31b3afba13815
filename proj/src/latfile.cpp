#include "herm2/latfile.hpp"
