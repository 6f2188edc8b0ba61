#include <adiapass/ensemble.hpp>
