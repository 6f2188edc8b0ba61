#include <adiapass/synthesis.hpp>
