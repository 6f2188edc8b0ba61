#include <adiapass/ladder.hpp>
