# Service layer package for the pmaplab algorithms
