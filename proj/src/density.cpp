#include "herm2/density.hpp"
